// vec_init
void test_init() {
    vec_init();
    assert(vec_len() == 0);
    assert(vec_empty());
    assert(!vec_full());
}

// vec_push
void test_push() {
    vec_init();
    assert(vec_push(10) == 0);
    assert(vec_len() == 1);
    assert(vec_get(0) == 10);
    assert(!vec_empty());
}

// vec_push until full
void test_push_full() {
    vec_init();
    int i = 0;
    while (i < 8) {
        assert(vec_push(i) == 0);
        i = i + 1;
    }
    assert(vec_full());
    assert(vec_push(99) == 0 - 1);
    assert(vec_len() == 8);
}

// vec_pop
void test_pop() {
    vec_init();
    vec_push(4);
    vec_push(5);
    assert(vec_pop() == 5);
    assert(vec_pop() == 4);
    assert(vec_pop() == 0 - 1);
    assert(vec_empty());
}

// vec_get and vec_set, with tail positions
void test_get_set() {
    vec_init();
    vec_push(1);
    vec_push(2);
    vec_push(3);
    assert(vec_get(0 - 1) == 3);
    assert(vec_set(1, 20) == 0);
    assert(vec_get(1) == 20);
    assert(vec_get(5) == 0 - 1);
    assert(vec_set(0 - 4, 9) == 0 - 1);
}

// vec_remove
void test_remove() {
    vec_init();
    vec_push(1);
    vec_push(2);
    vec_push(3);
    assert(vec_remove(1) == 2);
    assert(vec_len() == 2);
    assert(vec_get(0) == 1);
    assert(vec_get(1) == 3);
    assert(vec_remove(7) == 0 - 1);
}

// vec_find
void test_find() {
    vec_init();
    vec_push(5);
    vec_push(6);
    vec_push(5);
    assert(vec_find(5) == 0);
    assert(vec_find(6) == 1);
    assert(vec_find(42) == 0 - 1);
}

// vec_sum
void test_sum() {
    vec_init();
    assert(vec_sum() == 0);
    vec_push(3);
    vec_push(4);
    assert(vec_sum() == 7);
}

// vec_count
void test_count() {
    vec_init();
    vec_push(5);
    vec_push(6);
    vec_push(5);
    assert(vec_count(5) == 2);
    assert(vec_count(9) == 0);
}

// clamp_value
void test_clamp() {
    assert(clamp_value(10, 0, 5) == 5);
    assert(clamp_value(0 - 3, 0, 5) == 0);
    assert(clamp_value(2, 0, 5) == 2);
}

// maxi and mini
void test_minmax() {
    assert(maxi(2, 3) == 3);
    assert(mini(2, 3) == 2);
    assert(maxi(0 - 1, 1) == 1);
}
