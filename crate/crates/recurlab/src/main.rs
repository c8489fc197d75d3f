fn main() {
    recurlab::cli::main();
}
