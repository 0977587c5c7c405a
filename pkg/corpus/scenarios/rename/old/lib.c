int data[4];
int length = 0;

int absolute_index(int idx) {
    int i = idx;
    if (i < 0) {
        i = i + length;
    }
    return i;
}

int first_item() {
    if (length == 0) { return 0 - 1; }
    return data[0];
}
