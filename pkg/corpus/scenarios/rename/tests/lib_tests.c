// tail positions map backwards
void test_normalize_index() {
    length = 3;
    assert(normalize_index(0 - 1) == 2);
    assert(normalize_index(1) == 1);
}

// first_item on the empty buffer
void test_first_item() {
    length = 0;
    assert(first_item() == 0 - 1);
}
