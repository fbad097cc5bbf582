fn main() {
    std::process::exit(qace::commands::main());
}
