public class M {
    public void run() {
        int b = 2;
        b = triple(b);
        System.out.println(b);
    }

    static int triple(int x) {
        return x * 3;
    }
}
