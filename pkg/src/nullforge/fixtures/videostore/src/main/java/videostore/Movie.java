package videostore;

/**
 * A title that can be rented. Subclasses decide the price and the
 * frequent renter points earned for a rental of a given length.
 */
public abstract class Movie {

    protected String title;

    public String getTitle() {
        return title;
    }

    public double determineAmount(int daysRented) {
        return 0;
    }

    public int determineFrequentRenterPoints(int daysRented) {
        return 1;
    }
}
