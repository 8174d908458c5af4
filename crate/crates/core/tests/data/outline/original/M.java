public class M {
    public void run() {
        int b = 2;
        b = b * 3;
        System.out.println(b);
    }
}
