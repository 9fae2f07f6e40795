fn main() {
    std::process::exit(sgi::cli::main_entry());
}
