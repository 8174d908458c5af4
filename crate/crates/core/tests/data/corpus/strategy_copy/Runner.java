public class Runner {
    private Op op;

    public Runner(Op op) {
        this.op = op;
    }

    public int run(int x, int y) {
        if (op == null) {
            throw new IllegalStateException("missing op");
        }
        return op.apply(x, y);
    }

    public static void main(String[] args) {
        Runner r = new Runner(new Plus());
        System.out.println(r.run(2, 3));
        r = new Runner(new Times());
        System.out.println(r.run(4, 5));
    }
}
