fn main() {
    println!("bilfwi");
}
