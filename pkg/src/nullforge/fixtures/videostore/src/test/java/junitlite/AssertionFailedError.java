package junitlite;

public class AssertionFailedError extends Error {

    public AssertionFailedError(String message) {
        super(message);
    }
}
