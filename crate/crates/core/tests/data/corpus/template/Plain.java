public class Plain extends Report {
    protected String header() {
        return "PLAIN";
    }

    protected String body(int n) {
        String s = "";
        for (int i = 0; i < n; i++) {
            s = s + i;
        }
        return s;
    }
}
