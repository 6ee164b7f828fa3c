use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use hmt_bench::agents::{act, AgentId, Decision, Refusal};
use hmt_bench::config::BenchmarkConfig;
use hmt_bench::dataset::{generate_dataset, Dataset};
use hmt_bench::evaluate::score;
use hmt_core::baselines::oracle_act;
use hmt_core::human::{state_at, HumanModel, Level};
use hmt_core::render::action_text;
use hmt_core::{Action, Container, Fixture, ObjectId};
use hmt_llm::prompt::{worked_example, EXAMPLE_ACTIONS};
use hmt_llm::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bench(n: usize, seed: u64) -> BenchmarkConfig {
    BenchmarkConfig { episodes_per_level: n, seed, levels: Level::ALL.to_vec(), ..BenchmarkConfig::default() }
}

fn fast(rung: PromptRung) -> LlmRunConfig {
    LlmRunConfig { rung, backoff: Duration::from_millis(1), concurrency: 3, ..LlmRunConfig::default() }
}

fn answer_block(plan: &[Action], s: &hmt_core::WorldState) -> String {
    let mut out = String::from("Let me think about it.\n\nActions:\n");
    let mut state = s.clone();
    for a in plan {
        out.push_str(&action_text(&state, a));
        out.push('\n');
        state = hmt_core::apply_action(&state, hmt_core::Agent::Robot, a).unwrap_or(state);
    }
    out
}

fn oracle_mock(ds: &Dataset, rung: PromptRung) -> MockEndpoint {
    let mut answers = HashMap::new();
    for ep in &ds.episodes {
        let plan = oracle_act(ep, 5).unwrap().plan;
        let user = build_prompt(ep, rung).pop().unwrap().content;
        answers.insert(user, answer_block(&plan, &ep.current()));
    }
    MockEndpoint { answers, fallback: String::new() }
}

#[test]
fn prompts_follow_the_rungs() {
    let ds = generate_dataset(&bench(2, 0)).unwrap();
    let ep = &ds.episodes[3];
    for rung in PromptRung::ALL {
        let m = build_prompt(ep, rung);
        assert_eq!(m, build_prompt(ep, rung));
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].role, Role::System);
        let all = format!("{}\n{}", m[0].content, m[1].content);
        assert!(all.contains("move to XXX") && all.contains("give XXX to human") && all.contains("\"Actions:\""));
        assert!(m[1].content.contains(&ep.utterance.surface));
        assert_eq!(all.contains("Goal 24:"), rung != PromptRung::Vanilla);
        assert_eq!(all.contains("Openable things"), rung != PromptRung::Vanilla);
        let asks_object = all.contains("Which object do you think the human is asking for?");
        assert_eq!(asks_object, matches!(rung, PromptRung::Fiser | PromptRung::FiserPr));
    }
    let pr = &build_prompt(ep, PromptRung::FiserPr)[1].content;
    let g = pr.find("1. What is human doing?").unwrap();
    let o = pr.find("2. Which object do you think the human is asking for?").unwrap();
    let a = pr.find("3. What are your actions?").unwrap();
    assert!(g < o && o < a);
}

#[test]
fn worked_example_answer_parses_to_four_actions() {
    let (s0, steps, _) = worked_example();
    let s = state_at(&s0, &steps, steps.len());
    let doc2 = ObjectId(1);
    let expected = vec![Action::MoveTo(Fixture::Sofa), Action::PickUp(doc2), Action::MoveTo(s.human().at), Action::GiveToHuman(doc2)];
    assert_eq!(parse_actions(EXAMPLE_ACTIONS, &s).unwrap(), expected);
    let with_adjective = "Actions:\n\nmove to sofa\n\npick up document 2\n\nmove to human\n\ngive dusty document 2 to human\n";
    assert_eq!(parse_actions(with_adjective, &s).unwrap(), expected);
}

#[test]
fn rendered_plans_parse_back() {
    let ds = generate_dataset(&bench(3, 1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let ep = ds.episodes.choose(&mut rng).unwrap();
        let s = ep.current();
        let objects: Vec<ObjectId> = s.objects().map(|o| o.id).collect();
        let obj = |rng: &mut ChaCha8Rng| *objects.choose(rng).unwrap();
        let fix = |rng: &mut ChaCha8Rng| *Fixture::ALL.choose(rng).unwrap();
        let cont = |rng: &mut ChaCha8Rng| if rng.gen() { Container::Fixture(fix(rng)) } else { Container::Object(obj(rng)) };
        let plan: Vec<Action> = (0..rng.gen_range(1..=6))
            .map(|_| match rng.gen_range(0..8) {
                0 => Action::MoveTo(fix(&mut rng)),
                1 => Action::PickUp(obj(&mut rng)),
                2 => Action::PickUpFrom(obj(&mut rng), fix(&mut rng)),
                3 => Action::PutInto(obj(&mut rng), cont(&mut rng)),
                4 => Action::PutOnto(obj(&mut rng), fix(&mut rng)),
                5 => Action::TakeFrom(obj(&mut rng), cont(&mut rng)),
                6 => Action::GiveToHuman(obj(&mut rng)),
                _ => Action::Open(cont(&mut rng)),
            })
            .collect();
        let text: Vec<String> = plan.iter().map(|a| action_text(&s, a)).collect();
        let completion = format!("Reasoning.\nActions:\n{}", text.join("\n"));
        assert_eq!(parse_actions(&completion, &s).unwrap(), plan, "{completion}");
    }
}

#[test]
fn oracle_echo_scores_full_marks_and_prose_scores_none() {
    let cfg = bench(6, 2);
    let ds = generate_dataset(&cfg).unwrap();
    let report = run_llm_eval(&ds, &oracle_mock(&ds, PromptRung::Fiser), None, None, &fast(PromptRung::Fiser), &cfg).unwrap();
    assert!(report.levels.iter().all(|l| l.success_rate == 100.0), "{}", hmt_bench::render_table(&[report.clone()]));

    let prose = MockEndpoint::constant("I would look for the object and hand it over.");
    let report = run_llm_eval(&ds, &prose, None, None, &fast(PromptRung::Vanilla), &cfg).unwrap();
    assert!(report.results.iter().all(|r| !r.success && r.refusal == Some(Refusal::NoActionsBlock)));
}

#[test]
fn llm_and_local_plans_score_identically() {
    let cfg = bench(4, 3);
    let ds = generate_dataset(&cfg).unwrap();
    let mut answers = HashMap::new();
    let mut local = Vec::new();
    for ep in &ds.episodes {
        let d = act(AgentId::Heuristic, ep, &ds.header.generation, &mut HumanModel::new());
        let plan = d.plan.clone().unwrap_or_default();
        answers.insert(build_prompt(ep, PromptRung::Pe).pop().unwrap().content, answer_block(&plan, &ep.current()));
        local.push(score(ep, &Decision { chosen: None, plan: Ok(plan) }, 5));
    }
    let mock = MockEndpoint { answers, fallback: String::new() };
    let report = run_llm_eval(&ds, &mock, None, None, &fast(PromptRung::Pe), &cfg).unwrap();
    assert_eq!(serde_json::to_string(&report.results).unwrap(), serde_json::to_string(&local).unwrap());
}

#[test]
fn replay_reproduces_the_recorded_run() {
    let cfg = bench(3, 4);
    let ds = generate_dataset(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exchanges.jsonl");
    let run = fast(PromptRung::FiserPr);
    let live = {
        let log = ExchangeLog::new(std::fs::File::create(&path).unwrap());
        run_llm_eval(&ds, &oracle_mock(&ds, PromptRung::FiserPr), None, Some(&log), &run, &cfg).unwrap()
    };
    let cache = ReplayCache::load(BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(cache.len(), ds.episodes.len());
    let offline = FnEndpoint(|_: &ChatRequest| -> Result<ChatResponse, EndpointError> { panic!("replay must not call out") });
    let replay = LlmRunConfig { cache_mode: CacheMode::Replay, ..run.clone() };
    let again = run_llm_eval(&ds, &offline, Some(&cache), None, &replay, &cfg).unwrap();
    assert_eq!(live.to_json(), again.to_json());

    let other_model = LlmRunConfig { model: "other".into(), ..replay };
    let missed = run_llm_eval(&ds, &offline, Some(&cache), None, &other_model, &cfg).unwrap();
    assert!(missed.results.iter().all(|r| !r.success));
}

#[test]
fn in_flight_requests_respect_the_limit() {
    let cfg = bench(5, 5);
    let ds = generate_dataset(&cfg).unwrap();
    let now = Arc::new(AtomicUsize::new(0));
    let peak = Arc::new(AtomicUsize::new(0));
    let (n, p) = (now.clone(), peak.clone());
    let ep = FnEndpoint(move |_: &ChatRequest| {
        let c = n.fetch_add(1, Ordering::SeqCst) + 1;
        p.fetch_max(c, Ordering::SeqCst);
        std::thread::sleep(Duration::from_millis(5));
        n.fetch_sub(1, Ordering::SeqCst);
        Ok(ChatResponse::text("Actions:\n"))
    });
    let run = LlmRunConfig { concurrency: 2, ..fast(PromptRung::Vanilla) };
    run_llm_eval(&ds, &ep, None, None, &run, &cfg).unwrap();
    assert!(peak.load(Ordering::SeqCst) <= 2);
    assert!(peak.load(Ordering::SeqCst) >= 1);
}

#[test]
fn retries_back_off_and_give_up() {
    let calls = AtomicUsize::new(0);
    let flaky = FnEndpoint(|_: &ChatRequest| {
        if calls.fetch_add(1, Ordering::SeqCst) < 2 {
            Err(EndpointError::RateLimited)
        } else {
            Ok(ChatResponse::text("Actions:\nmove to sofa"))
        }
    });
    let req = ChatRequest { model: "m".into(), temperature: 0.0, max_tokens: None, messages: vec![] };
    let (r, retries) = call_with_retries(&flaky, &req, 3, Duration::from_millis(1));
    assert!(r.is_ok());
    assert_eq!(retries, 2);

    let down = FnEndpoint(|_: &ChatRequest| Err(EndpointError::Transport("reset".into())));
    let (r, retries) = call_with_retries(&down, &req, 3, Duration::from_millis(1));
    assert!(r.is_err());
    assert_eq!(retries, 3);

    let cfg = bench(1, 6);
    let ds = generate_dataset(&cfg).unwrap();
    let report = run_llm_eval(&ds, &down, None, None, &fast(PromptRung::Vanilla), &cfg).unwrap();
    assert!(report.results.iter().all(|r| matches!(r.refusal, Some(Refusal::Other { .. }))));
    let gone = FnEndpoint(|_: &ChatRequest| Err(EndpointError::Unreachable("refused".into())));
    assert!(matches!(run_llm_eval(&ds, &gone, None, None, &fast(PromptRung::Vanilla), &cfg), Err(LlmError::EndpointUnreachable(_))));
}

#[test]
fn http_endpoint_speaks_chat_completions() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let server = std::thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut head = Vec::new();
        let mut len = 0;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if let Some(v) = line.to_lowercase().strip_prefix("content-length:") {
                len = v.trim().parse().unwrap();
            }
            if line == "\r\n" {
                break;
            }
            head.push(line);
        }
        let mut body = vec![0; len];
        reader.read_exact(&mut body).unwrap();
        let reply = r#"{"choices":[{"message":{"role":"assistant","content":"Actions:\nmove to sofa"}}],"usage":{"prompt_tokens":12,"completion_tokens":4}}"#;
        write!(stream, "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{reply}", reply.len()).unwrap();
        (head, String::from_utf8(body).unwrap())
    });
    let ep = HttpEndpoint::new(&format!("http://{addr}/v1"), "HMT_TEST_UNSET_KEY", Duration::from_secs(5));
    let req = ChatRequest {
        model: "m".into(),
        temperature: 0.0,
        max_tokens: Some(8),
        messages: vec![Message { role: Role::User, content: "hi".into() }],
    };
    let r = ep.complete(&req).unwrap();
    assert_eq!(r.text, "Actions:\nmove to sofa");
    assert_eq!(r.prompt_tokens, Some(12));
    let (head, body) = server.join().unwrap();
    assert!(head[0].starts_with("POST /v1/chat/completions"));
    assert!(!head.iter().any(|h| h.to_lowercase().starts_with("authorization")));
    let sent: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(sent["messages"][0]["role"], "user");

    let closed = HttpEndpoint::new("http://127.0.0.1:1", "X", Duration::from_secs(2));
    assert!(matches!(closed.complete(&req), Err(EndpointError::Unreachable(_))));
}
