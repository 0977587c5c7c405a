int data[2];
int length = 0;

int get_at(int idx) {
    if (idx < 0) { return 0 - 1; }
    if (idx >= length) { return 0 - 1; }
    return data[idx];
}
