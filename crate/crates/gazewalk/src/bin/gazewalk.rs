fn main() {
    std::process::exit(gazewalk::cli::main_entry());
}
