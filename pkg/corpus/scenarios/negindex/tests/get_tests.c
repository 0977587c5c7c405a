// get_at in-range reads
void test_get_basics() {
    length = 2;
    data[0] = 5;
    data[1] = 7;
    assert(get_at(0) == 5);
    assert(get_at(1) == 7);
    assert(get_at(2) == 0 - 1);
}
