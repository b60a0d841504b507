#include <stdio.h>
#include <string.h>

#include "daont.h"

static int fail(const char *what, DaontStatus st) {
    const char *msg = daont_last_error_message();
    fprintf(stderr, "%s: status %d: %s\n", what, (int)st, msg ? msg : "(none)");
    return 1;
}

int main(void) {
    DaontSession *s = daont_session_new();
    uint64_t version = 0;
    char *json = NULL;
    DaontStatus st;

    if ((st = daont_load_fixture(s, "b2g-violation", &version)) != DAONT_STATUS_OK)
        return fail("load", st);
    if ((st = daont_check(s, "b2g-violation", "R-19-2a", false, &json)) != DAONT_STATUS_OK)
        return fail("check", st);
    if (!strstr(json, "\"overall_status\":\"violated\"") || !strstr(json, "competitiveProductDevelopment1"))
        return fail("report content", st);
    daont_string_free(json);

    st = daont_check(s, "missing", NULL, false, &json);
    if (st != DAONT_STATUS_UNKNOWN_GRAPH)
        return fail("unknown graph", st);

    printf("ok %s\n", daont_version());
    daont_session_free(s);
    return 0;
}
