import java.util.ArrayList;
import java.util.List;

public class Subject {
    private final List listeners = new ArrayList();
    private int value;

    public void add(Listener l) {
        listeners.add(l);
    }

    public void set(int v) {
        value = v;
        for (int i = 0; i < listeners.size(); i++) {
            ((Listener) listeners.get(i)).changed("value", value);
        }
    }

    public static void main(String[] args) {
        Subject s = new Subject();
        s.add(new Printer());
        s.set(42);
    }
}
