pub mod bench;
pub mod gen_queries;
pub mod match_cmd;
pub mod train;
pub mod verify;
