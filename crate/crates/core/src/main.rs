fn main() {
    std::process::exit(rcrae::harness::cli_main(std::env::args_os()));
}
