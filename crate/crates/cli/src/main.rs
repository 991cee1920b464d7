use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use codetoon_cli::commands::{comicgen, storygen, ComicArgs};
use codetoon_cli::server::{router, AppState};
use codetoon_cli::store::ProjectStore;
use codetoon_core::pipeline::Resources;
use codetoon_core::{Layout, Lexicon, SpriteSet, Unexecuted};

#[derive(Parser)]
#[command(name = "codetoon", version, about = "Turn small Python programs into story templates and comics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the story template for a program as JSON.
    Storygen {
        input: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render a program's comic to SVG, with the comic description alongside.
    Comicgen {
        input: PathBuf,
        /// Story template JSON or a map of slot id to fill.
        #[arg(long)]
        story: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Loop iterations to draw.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        iterations: u32,
        #[arg(long, default_value = "dimmed")]
        unexecuted: Unexecuted,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Sprite NDJSON file overriding the data directory.
        #[arg(long)]
        sprites: Option<PathBuf>,
        /// Lexicon JSON file overriding the data directory.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Directory for saved projects.
        #[arg(long, default_value = "projects")]
        projects: PathBuf,
    },
}

fn resources() -> Result<Resources, String> {
    Resources::from_env().map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Storygen { input, out } => {
            let json = storygen(&input).map_err(|e| e.to_string())?;
            match out {
                Some(path) => std::fs::write(&path, json).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{json}");
                    Ok(())
                }
            }
        }
        Command::Comicgen { input, story, out, iterations, unexecuted } => {
            let resources = resources()?;
            let args = ComicArgs { input, story, out, iterations, unexecuted };
            comicgen(&args, &resources.sprites, &Layout::default()).map_err(|e| e.to_string())?;
            Ok(())
        }
        Command::Serve { port, host, sprites, lexicon, projects } => {
            let mut resources = resources()?;
            if let Some(path) = sprites {
                resources.sprites = SpriteSet::load(&path).map_err(|e| e.to_string())?;
            }
            if let Some(path) = lexicon {
                resources.lexicon = Lexicon::load(&path).map_err(|e| e.to_string())?;
            }
            let store = ProjectStore::new(projects).map_err(|e| e.to_string())?;
            let state = AppState { resources: Arc::new(resources), store: Arc::new(store), layout: Layout::default() };
            serve(SocketAddr::new(host, port), state)
        }
    }
}

fn serve(addr: SocketAddr, state: AppState) -> Result<(), String> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| format!("cannot bind {addr}: {e}"))?;
        eprintln!("listening on http://{addr}");
        axum::serve(listener, router(state)).await.map_err(|e| e.to_string())
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("{message}");
            ExitCode::FAILURE
        }
    }
}
