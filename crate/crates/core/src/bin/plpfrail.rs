fn main() {
    std::process::exit(plp_frailty::cli::main_with(std::env::args_os()));
}
