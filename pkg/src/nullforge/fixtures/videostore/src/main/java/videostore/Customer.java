package videostore;

import java.util.Enumeration;
import java.util.Vector;

public class Customer {

    private final String name;
    private Vector rentals = new Vector();

    public Customer(String name) {
        if (name == null || name.length() == 0) {
            throw new IllegalArgumentException("A customer needs a name");
        }
        this.name = name;
    }

    public String getName() {
        return name;
    }

    public void addRental(Rental rental) {
        rentals.addElement(rental);
    }

    public double getTotalCharge() {
        double total = 0;
        Enumeration each = rentals.elements();
        while (each.hasMoreElements()) {
            total += ((Rental) each.nextElement()).getCharge();
        }
        return total;
    }

    public int getTotalFrequentRenterPoints() {
        int points = 0;
        Enumeration each = rentals.elements();
        while (each.hasMoreElements()) {
            points += ((Rental) each.nextElement()).getFrequentRenterPoints();
        }
        return points;
    }

    public String statement() {
        StringBuffer result = new StringBuffer();
        result.append("Rental Record for " + getName() + "\n");
        Enumeration each = rentals.elements();
        while (each.hasMoreElements()) {
            Rental rental = (Rental) each.nextElement();
            result.append("\t" + rental.getMovie().getTitle() + "\t" + rental.getCharge() + "\n");
        }
        result.append("You owed " + getTotalCharge() + "\n");
        result.append("You earned " + getTotalFrequentRenterPoints() + " frequent renter points\n");
        return result.toString();
    }
}
