int mulv(int a, int b) {
    return a * b + b;
}

int twice_plus(int a, int b) {
    return a + a + b;
}
