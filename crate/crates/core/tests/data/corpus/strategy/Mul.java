public class Mul implements Strategy {
    public int apply(int a, int b) {
        int r = 0;
        for (int i = 0; i < b; i++) {
            r += a;
        }
        return r;
    }
}
