package videostore;

public class NewReleaseMovie extends Movie {

    public NewReleaseMovie(String title) {
        this.title = title;
    }

    public double determineAmount(int daysRented) {
        return daysRented * 3;
    }

    public int determineFrequentRenterPoints(int daysRented) {
        int points = 1;
        // bonus point for a two day new release rental
        if (daysRented > 1) {
            points++;
        }
        return points;
    }
}
