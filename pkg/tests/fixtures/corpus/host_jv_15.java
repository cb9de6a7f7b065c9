public class Totals {
    public static int sumAbove(int[] values, int cutoff) {
        int total = 0;
        for (int i = 0; i < values.length; i = i + 1) {
            if (values[i] > cutoff) {
                total = total + values[i];
            }
        }
        return total;
    }

    public static void main(String[] args) {
        int[] data = {21, 20, 38};
        System.out.println(sumAbove(data, 27));
    }
}
