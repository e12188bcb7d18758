fn main() {
    std::process::exit(tcwiener::cli::cli_main(std::env::args_os()));
}
