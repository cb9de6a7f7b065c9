public class Meter {
    private int total;

    public Meter(int opening) {
        this.total = opening;
    }

    public int add(int amount) {
        total = total + amount;
        return total;
    }

    public static void main(String[] args) {
        Meter box = new Meter(21);
        System.out.println(box.add(39));
    }
}
