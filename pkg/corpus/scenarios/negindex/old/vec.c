int data[2];
int length = 0;

int get_at(int idx) {
    int i = idx;
    if (i < 0) {
        i = i + length;
    }
    if (i < 0) { return 0 - 1; }
    if (i >= length) { return 0 - 1; }
    return data[i];
}
