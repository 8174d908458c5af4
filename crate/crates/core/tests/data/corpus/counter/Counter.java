public class Counter {
    private int[] counts = new int[26];

    public void feed(String s) {
        for (int i = 0; i < s.length(); i++) {
            char c = s.charAt(i);
            if (c >= 'a' && c <= 'z') {
                counts[c - 'a']++;
            }
        }
    }

    public int most() {
        int best = 0;
        for (int i = 1; i < counts.length; i++) {
            if (counts[i] > counts[best]) {
                best = i;
            }
        }
        return best;
    }

    public static void main(String[] args) {
        Counter c = new Counter();
        c.feed("hello world");
        System.out.println((char) ('a' + c.most()));
    }
}
