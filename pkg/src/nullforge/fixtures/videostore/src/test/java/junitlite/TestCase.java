package junitlite;

/**
 * JUnit 3 style base class: public no-argument methods named test* are
 * run on a fresh instance after setUp().
 */
public abstract class TestCase {

    protected void setUp() throws Exception {
    }

    public static void fail(String message) {
        throw new AssertionFailedError(message);
    }

    public static void assertTrue(String message, boolean condition) {
        if (!condition) {
            fail(message);
        }
    }

    public static void assertTrue(boolean condition) {
        assertTrue("expected true", condition);
    }

    public static void assertNull(Object actual) {
        if (actual != null) {
            fail("expected null but was <" + actual + ">");
        }
    }

    public static void assertNotNull(Object actual) {
        if (actual == null) {
            fail("expected a value but was null");
        }
    }

    public static void assertEquals(Object expected, Object actual) {
        if (expected == null ? actual != null : !expected.equals(actual)) {
            fail("expected <" + expected + "> but was <" + actual + ">");
        }
    }

    public static void assertEquals(int expected, int actual) {
        if (expected != actual) {
            fail("expected <" + expected + "> but was <" + actual + ">");
        }
    }

    public static void assertEquals(double expected, double actual, double delta) {
        if (Math.abs(expected - actual) > delta) {
            fail("expected <" + expected + "> but was <" + actual + ">");
        }
    }
}
