fn main() {
    std::process::exit(votebound::cli::run(std::env::args_os()));
}
