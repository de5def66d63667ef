fn main() {
    std::process::exit(botminer::run(std::env::args_os()));
}
