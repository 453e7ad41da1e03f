use recall_agent::conformance::{case_dirs, check_case, default_fixture_dir};
use recall_agent::{PolicyDecision, PolicyRequest, WIRE_VERSION};

fn bless() -> bool {
    std::env::var_os("RECALL_BLESS_WIRE").is_some()
}

#[test]
fn corpus_round_trips() {
    let dirs = case_dirs(&default_fixture_dir()).unwrap();
    assert_eq!(dirs.len(), 10);
    for d in dirs {
        check_case(&d, bless()).unwrap();
    }
}

fn run(name: &str) -> recall_agent::conformance::CaseOutcome {
    check_case(&default_fixture_dir().join(name), false).unwrap()
}

fn plain_request(body: &str) -> PolicyRequest {
    serde_json::from_str(body).unwrap()
}

#[test]
fn fixed_reply_is_executed_verbatim() {
    let out = run("01_navigate_verbatim");
    assert_eq!(out.requests.len(), 1);
    let PolicyDecision::Act { action, .. } = out.decision else { panic!() };
    assert_eq!(action.tool, "navigate");
    assert_eq!(action.text("landmark"), Some("study_desk"));
    let req = plain_request(&out.requests[0]);
    assert_eq!(req.schema_version, WIRE_VERSION);
    assert!(req.trace.is_empty());
    assert!(req.reprompt.is_none());
}

#[test]
fn three_step_trace_is_serialized_in_order() {
    let out = run("02_three_step_trace");
    let req = plain_request(&out.requests[0]);
    let tools: Vec<_> = req.trace.iter().map(|e| e.action.tool.as_str()).collect();
    assert_eq!(tools, ["semantic_query", "navigate", "detect"]);
    assert_eq!(req.remaining_budget, 17);
}

#[test]
fn malformed_reply_gets_exactly_one_reprompt() {
    let out = run("03_malformed_then_valid");
    assert_eq!(out.requests.len(), 2);
    let first = plain_request(&out.requests[0]);
    let second = plain_request(&out.requests[1]);
    assert!(first.reprompt.is_none());
    assert!(second.reprompt.as_deref().unwrap().contains("malformed"));
    assert!(matches!(out.decision, PolicyDecision::Act { .. }));

    let out = run("04_malformed_twice");
    assert_eq!(out.requests.len(), 2);
    assert!(matches!(out.decision, PolicyDecision::Abort { .. }));
}

#[test]
fn transport_failures_are_retried_then_abort() {
    let out = run("05_transport_down");
    assert_eq!(out.requests.len(), 3);
    assert!(out.requests.windows(2).all(|w| w[0] == w[1]));
    assert!(matches!(out.decision, PolicyDecision::Abort { .. }));

    let out = run("06_transport_retry");
    assert_eq!(out.requests.len(), 2);
    assert!(matches!(out.decision, PolicyDecision::Act { .. }));
}

#[test]
fn chat_requests_embed_the_protocol_and_tools() {
    let out = run("07_chat_tool_call");
    let v: serde_json::Value = serde_json::from_str(&out.requests[0]).unwrap();
    let user = v["messages"][1]["content"].as_str().unwrap();
    let inner = plain_request(user);
    assert_eq!(inner.trace.len(), 1);
    let names: Vec<_> = v["tools"].as_array().unwrap().iter().map(|t| t["function"]["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"fetch_raw") && names.contains(&"pick"));

    let out = run("09_chat_two_calls");
    assert_eq!(out.requests.len(), 2);
    let v: serde_json::Value = serde_json::from_str(&out.requests[1]).unwrap();
    assert_eq!(v["messages"].as_array().unwrap().len(), 3);
}
