// vec_insert at the boundaries
void test_insert() {
    vec_init();
    int p = 0;
    int v = 7;
    assert(vec_insert(p, v) == 0);
    assert(vec_get(0) == 7);
    p = vec_len();
    v = 9;
    assert(vec_insert(p, v) == 0);
    assert(vec_get(1) == 9);
    assert(vec_len() == 2);
}

// vec_insert generalized
void test_insert_general() {
    vec_init();
    vec_push(10);
    vec_push(20);
    int val = nondet_int();
    int pos = nondet_int();
    assume(pos >= 0);
    assume(pos <= vec_len());
    int before = vec_sum();
    assert(vec_insert(pos, val) == 0);
    assert(vec_get(pos) == val);
    assert(vec_sum() == before + val);
    assert(vec_len() == 3);
}
