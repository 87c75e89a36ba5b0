use std::path::Path;
use std::time::Duration;

use snipkit::sandbox::{CannedEval, ErrorPayload, ProcessTransport, SandboxClient, SandboxError, StubScript};

fn stub_client(dir: &Path, script: &StubScript) -> SandboxClient {
    let path = dir.join("script.json");
    std::fs::write(&path, serde_json::to_string(script).unwrap()).unwrap();
    let bin = Path::new(env!("CARGO_BIN_EXE_snipkit"));
    let args = vec!["stub-runner".to_string(), path.to_string_lossy().into_owned()];
    let transport = ProcessTransport::spawn(bin, &args, dir).unwrap();
    SandboxClient::new(Box::new(transport), Duration::from_secs(10))
}

fn canned(code: &str, console: &[&str], value: Option<&str>, error: Option<(&str, &str)>) -> CannedEval {
    CannedEval {
        code: code.into(),
        console: console.iter().map(|s| s.to_string()).collect(),
        value_repr: value.map(str::to_string),
        error: error.map(|(name, message)| ErrorPayload { name: name.into(), message: message.into(), stack_top_line: None }),
    }
}

#[test]
fn golden_exchange_over_a_child_process() {
    let dir = tempfile::tempdir().unwrap();
    let script = StubScript {
        evals: vec![
            canned("1+1", &[], Some("2"), None),
            canned("console.log('hi'); 3", &["hi"], Some("3"), None),
            canned("require('nope')", &[], None, Some(("Error [MODULE_NOT_FOUND]", "Cannot find module 'nope'"))),
        ],
    };
    let mut client = stub_client(dir.path(), &script);

    let r = client.eval("1+1").unwrap();
    assert_eq!((r.response.id, r.response.ok, r.response.value_repr.as_deref()), (1, true, Some("2")));

    let r = client.eval("console.log('hi'); 3").unwrap();
    assert_eq!(r.response.value_repr.as_deref(), Some("3"));
    assert_eq!(r.console, ["hi"]);

    let r = client.eval("require('nope')").unwrap();
    assert!(!r.response.ok);
    assert!(r.response.error.unwrap().name.contains("MODULE_NOT_FOUND"));

    let r = client.ping().unwrap();
    assert_eq!((r.response.id, r.response.ok), (4, true));
    let r = client.reset().unwrap();
    assert_eq!(r.response.id, 5);
    assert_eq!(client.eval("anything else").unwrap().response.value_repr.as_deref(), Some("undefined"));
    client.shutdown();
}

#[test]
fn hundred_sequential_requests_keep_ids_in_step() {
    let dir = tempfile::tempdir().unwrap();
    let mut client = stub_client(dir.path(), &StubScript::default());
    for i in 1..=100 {
        let r = client.eval(&format!("x{i}")).unwrap();
        assert_eq!(r.response.id, i);
    }
    client.shutdown();
}

#[test]
fn dead_runner_is_reported_as_a_crash() {
    let dir = tempfile::tempdir().unwrap();
    let args = vec!["-c".to_string(), "read line; exit 3".to_string()];
    let transport = ProcessTransport::spawn(Path::new("sh"), &args, dir.path()).unwrap();
    let mut client = SandboxClient::new(Box::new(transport), Duration::from_secs(10));
    assert!(matches!(client.eval("1"), Err(SandboxError::Crashed)));
}

#[test]
fn silent_runner_times_out() {
    let dir = tempfile::tempdir().unwrap();
    let args = vec!["-c".to_string(), "sleep 30".to_string()];
    let transport = ProcessTransport::spawn(Path::new("sh"), &args, dir.path()).unwrap();
    let mut client = SandboxClient::new(Box::new(transport), Duration::from_millis(200));
    assert!(matches!(client.eval("1"), Err(SandboxError::Timeout(_))));
    client.kill();
}

#[test]
fn missing_runtime_fails_to_spawn() {
    let dir = tempfile::tempdir().unwrap();
    let err = ProcessTransport::spawn(Path::new("/nonexistent/node"), &[], dir.path()).err().unwrap();
    assert!(matches!(err, SandboxError::Spawn(_)), "{err:?}");
}
