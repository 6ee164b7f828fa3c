//! Versioned JSON form of [`WorldState`].

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::vocab::{Fixture, Genre, Noun};
use crate::world::{AgentState, Attributes, Location, ObjectEntity, ObjectId, WorldState};

pub const WORLD_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDoc {
    id: ObjectId,
    noun: Noun,
    genre: Genre,
    instance: u32,
    attributes: Attributes,
    location: Location,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentsDoc {
    human: AgentState,
    robot: AgentState,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldDoc {
    schema_version: u32,
    open_fixtures: Vec<Fixture>,
    objects: Vec<ObjectDoc>,
    agents: AgentsDoc,
}

impl Serialize for WorldState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WorldDoc {
            schema_version: WORLD_SCHEMA_VERSION,
            open_fixtures: self.open_fixtures().collect(),
            objects: self
                .objects()
                .map(|o| ObjectDoc {
                    id: o.id,
                    noun: o.noun,
                    genre: o.genre(),
                    instance: o.instance,
                    attributes: o.attributes,
                    location: o.location,
                })
                .collect(),
            agents: AgentsDoc { human: *self.human(), robot: *self.robot() },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WorldState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = WorldDoc::deserialize(d)?;
        if doc.schema_version != WORLD_SCHEMA_VERSION {
            return Err(D::Error::custom(format!("unsupported world schema version {}", doc.schema_version)));
        }
        let mut objects = Vec::with_capacity(doc.objects.len());
        for o in doc.objects {
            if o.noun.genre() != o.genre {
                return Err(D::Error::custom(format!("{} is not a {}", o.noun, o.genre)));
            }
            objects.push(ObjectEntity { id: o.id, noun: o.noun, instance: o.instance, attributes: o.attributes, location: o.location });
        }
        let state = WorldState::new(objects, doc.open_fixtures, doc.agents.human.at, doc.agents.robot.at)
            .map_err(D::Error::custom)?;
        if state.human().holding != doc.agents.human.holding || state.robot().holding != doc.agents.robot.holding {
            return Err(D::Error::custom("agent holdings disagree with object locations"));
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Container;

    #[test]
    fn json_round_trip_and_rejections() {
        let s = WorldState::new(
            [ObjectEntity {
                id: ObjectId(3),
                noun: Noun::named("book"),
                instance: 0,
                attributes: Attributes { dusty: true, ..Default::default() },
                location: Location::Inside(Container::Fixture(Fixture::Cabinet)),
            }],
            [Fixture::Cabinet],
            Fixture::Sofa,
            Fixture::Floor,
        )
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"schema_version\":1"));
        assert!(text.contains("\"genre\":\"paper-product\""));
        let back: WorldState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);

        let bad_attr = text.replace("\"dusty\":true", "\"sparkly\":true");
        assert!(serde_json::from_str::<WorldState>(&bad_attr).is_err());
        let bad_genre = text.replace("paper-product", "drink");
        assert!(serde_json::from_str::<WorldState>(&bad_genre).is_err());
        let bad_version = text.replace("\"schema_version\":1", "\"schema_version\":9");
        assert!(serde_json::from_str::<WorldState>(&bad_version).is_err());
    }
}
