public class Weaver {
    public static String frame(String word) {
        String trimmed = word.trim();
        String framed = "[" + trimmed + "]";
        return framed;
    }

    public static void main(String[] args) {
        System.out.println(frame(" amber "));
    }
}
