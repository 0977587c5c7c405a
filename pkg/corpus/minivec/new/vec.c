/* Bounded int vector backed by a fixed global buffer. */

int data[8];
int length = 0;

void vec_init() {
    length = 0;
    int i = 0;
    while (i < 8) {
        data[i] = 0;
        i = i + 1;
    }
}

int vec_len() {
    return length;
}

bool vec_full() {
    return length >= 8;
}

bool vec_empty() {
    return length == 0;
}

int maxi(int a, int b) {
    if (a > b) { return a; }
    return b;
}

int mini(int a, int b) {
    if (a < b) { return a; }
    return b;
}

/* clamp x into [lo, hi]; renamed for clarity */
int clamp_value(int x, int lo, int hi) {
    return maxi(lo, mini(x, hi));
}

int abs_index(int idx) {
    if (idx < 0) { return idx + length; }
    return idx;
}

int vec_get(int idx) {
    int i = abs_index(idx);
    if (i < 0) { return 0 - 1; }
    if (i >= length) { return 0 - 1; }
    return data[i];
}

int vec_set(int idx, int val) {
    int i = abs_index(idx);
    if (i < 0) { return 0 - 1; }
    if (i >= length) { return 0 - 1; }
    data[i] = val;
    return 0;
}

int vec_push(int val) {
    if (vec_full()) { return 0 - 1; }
    data[length] = val;
    length = length + 1;
    return 0;
}

int vec_pop() {
    if (length == 0) { return 0 - 1; }
    length = length - 1;
    return data[length];
}

int vec_insert(int pos, int val) {
    if (vec_full()) { return 0 - 1; }
    if (pos < 0) { return 0 - 1; }
    if (pos > length) { return 0 - 1; }
    int i = length;
    while (i > pos + 1) {
        data[i] = data[i - 1];
        i = i - 1;
    }
    data[pos] = val;
    length = length + 1;
    return 0;
}

int vec_remove(int pos) {
    if (pos < 0) { return 0 - 1; }
    if (pos >= length) { return 0 - 1; }
    int removed = data[pos];
    int i = pos;
    while (i < length - 1) {
        data[i] = data[i + 1];
        i = i + 1;
    }
    length = length - 1;
    return removed;
}

int vec_find(int val) {
    int i = 0;
    while (i < length) {
        if (data[i] == val) { return i; }
        i = i + 1;
    }
    return 0 - 1;
}

int vec_sum() {
    int s = 0;
    int i = 0;
    while (i < length) {
        s = s + data[i];
        i = i + 1;
    }
    return s;
}

int vec_count(int val) {
    int n = 0;
    int i = 0;
    while (i < length) {
        if (val == data[i]) { n = n + 1; }
        i = i + 1;
    }
    return n;
}
