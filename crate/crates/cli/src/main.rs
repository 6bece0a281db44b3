fn main() {
    std::process::exit(densir_cli::cli::main_exit_code());
}
