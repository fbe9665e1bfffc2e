//! `treehide-serve [ADDR]`: serve the session API, by default on
//! 127.0.0.1:8080. `TREEHIDE_MAX_SESSIONS` caps the number of live sessions.

use treehide_service::{router, AppState, DEFAULT_MAX_SESSIONS};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let addr = std::env::args().nth(1).unwrap_or_else(|| "127.0.0.1:8080".to_owned());
    let cap = std::env::var("TREEHIDE_MAX_SESSIONS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_SESSIONS);
    let listener = tokio::net::TcpListener::bind(&addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(cap))).await
}
