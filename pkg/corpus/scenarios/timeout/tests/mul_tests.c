// mulv spot check
void test_mulv() {
    int x = 3;
    int y = 4;
    assert(mulv(x, y) == 16);
}

// twice_plus spot check
void test_twice_plus() {
    assert(twice_plus(2, 1) == 5);
}
