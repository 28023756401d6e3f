#![allow(dead_code)]

pub mod colourings;
pub mod corpus;
pub mod golden;
pub mod messages;
pub mod oracle;
