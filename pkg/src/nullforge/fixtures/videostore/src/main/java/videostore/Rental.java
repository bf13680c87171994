package videostore;

public class Rental {

    private Movie movie;
    private final int daysRented;

    public Rental(Movie movie, int daysRented) {
        if (daysRented < 1) {
            throw new IllegalArgumentException("A rental lasts at least one day, got " + daysRented);
        }
        setMovie(movie);
        this.daysRented = daysRented;
    }

    /** A rental of an untitled regular movie. */
    public Rental(int daysRented) {
        this(new RegularMovie(null), daysRented);
    }

    private void setMovie(Movie movie) {
        if (movie == null) {
            this.movie = new RegularMovie(null);
        } else {
            this.movie = movie;
        }
    }

    public Movie getMovie() {
        return movie;
    }

    public int getDaysRented() {
        return daysRented;
    }

    public double getCharge() {
        return movie.determineAmount(daysRented);
    }

    public int getFrequentRenterPoints() {
        return movie.determineFrequentRenterPoints(daysRented);
    }
}
