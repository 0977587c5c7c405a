int data[4];
int length = 0;

/* maps negative positions onto the tail of the buffer */
int normalize_index(int idx) {
    int i = idx; /* work on a copy */
    if (i < 0) {
        i = i + length;
    }
    return i;
}

int first_item() {
    if (length == 0) { return 0 - 1; }
    return data[0];
}
