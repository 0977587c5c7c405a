int mulv(int a, int b) {
    return (a + 1) * b;
}

int twice_plus(int a, int b) {
    return a + a + b;
}
