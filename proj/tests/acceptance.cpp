// Placeholder; replaced by the full acceptance suite.
int main() { return 0; }
