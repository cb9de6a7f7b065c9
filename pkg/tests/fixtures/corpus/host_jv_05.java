public class Meter {
    public static String repeat(int times) {
        String out = "";
        for (int i = 0; i < times; i = i + 1) {
            out = out + "delta";
        }
        return out;
    }

    public static void main(String[] args) {
        System.out.println(repeat(3));
    }
}
