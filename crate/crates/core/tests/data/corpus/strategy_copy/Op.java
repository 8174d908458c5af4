public interface Op {
    int apply(int left, int right);
}
