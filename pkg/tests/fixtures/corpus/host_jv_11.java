public class Ledger {
    public static int multiples(int limit, int step) {
        int hits = 0;
        for (int i = 0; i < limit; i = i + 1) {
            if (i % step == 0) {
                hits = hits + 1;
            }
        }
        return hits;
    }

    public static void main(String[] args) {
        System.out.println(multiples(13, 4));
    }
}
