//! Classify domains through a chat-completion endpoint. Without
//! arguments an in-process mock stands in for the model server.
//!
//! cargo run --example llm_gateway -- http://localhost:8000/v1 my-model

use squatlab::gateway::mock::{MockReply, MockServer};
use squatlab::gateway::{EndpointConfig, LlmClient};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    // Answers "True" for anything that is not an exact brand.
    let mock = MockServer::start(|req| {
        let brands = ["google.com", "paypal.com", "apple.com"];
        MockReply::content(if req.user_message().is_some_and(|d| brands.contains(&d)) { "False" } else { "True" })
    })?;
    let (base, model) = match args.as_slice() {
        [base, model, ..] => (base.clone(), model.clone()),
        _ => (mock.base_url(), "mock".to_string()),
    };
    let client = LlmClient::new(EndpointConfig::new(base, model))?;
    let domains = ["google.com", "go0gle.com", "paypal.co", "apple.com", "apple-support.com"];
    for (domain, verdict) in domains.iter().zip(client.batch_classify(&domains)) {
        println!("{domain:20} {verdict:?}");
    }
    if args.is_empty() {
        println!("{} requests served by the mock", mock.request_count());
    }
    Ok(())
}
