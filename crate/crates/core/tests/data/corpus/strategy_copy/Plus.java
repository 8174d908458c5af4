public class Plus implements Op {
    public int apply(int left, int right) {
        return left + right;
    }
}
