public class Circle implements Shape {
    private double radius;
    static int created;

    public Circle(double radius) {
        this.radius = radius;
        created++;
    }

    public double area() {
        return 3.14159 * radius * radius;
    }

    public String name() {
        return "circle";
    }

    public long scaled(int factor) {
        long big = 10000000000L;
        float f = 1.5f;
        return (long) (area() * factor * f) + big;
    }
}
