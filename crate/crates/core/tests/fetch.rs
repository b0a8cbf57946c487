//! Fetcher behavior against a local HTTP server: successes persisted as
//! jsonl, failures collected per URL without aborting the batch.

use std::io::{Read, Write};
use std::net::TcpListener;

use fomc_topics::corpus::{fetch_statements, strip_markup};

/// Serves `n` requests of a fixed HTML page on an ephemeral port.
fn spawn_server(n: usize) -> u16 {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port();
    std::thread::spawn(move || {
        for _ in 0..n {
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = [0u8; 4096];
            let _ = stream.read(&mut buf);
            let body = "<html><head><title>x</title><style>p{}</style></head>\
                        <body><p>The Committee decided to keep the target&nbsp;range.</p></body></html>";
            let resp = format!(
                "HTTP/1.1 200 OK\r\nContent-Type: text/html\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                body.len(),
                body
            );
            stream.write_all(resp.as_bytes()).unwrap();
        }
    });
    port
}

#[test]
fn fetch_persists_successes_and_collects_failures() {
    let port = spawn_server(1);
    // Second URL points at a closed port: per-URL failure, not fatal.
    let urls = vec![
        format!("http://127.0.0.1:{port}/monetary20200315a.htm"),
        "http://127.0.0.1:1/monetary20200316a.htm".to_string(),
    ];
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fetched.jsonl");
    let (docs, failures) = fetch_statements(&urls, &out).unwrap();

    assert_eq!(docs.len(), 1);
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].url, urls[1]);

    let doc = &docs[0];
    assert_eq!(doc.id, "monetary20200315a");
    assert_eq!(doc.date.to_string(), "2020-03-15");
    let plain = strip_markup(doc);
    assert_eq!(plain.text, "x The Committee decided to keep the target range.");

    // One jsonl line per fetched document.
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("monetary20200315a"));
}
