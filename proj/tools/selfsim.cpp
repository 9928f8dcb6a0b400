// placeholder; filled in once the pipeline lands
int main() { return 0; }
