#include <stdio.h>
#include <string.h>
#include "ludics.h"

int main(void) {
    const char *src = "let xi = 0\n"
                      "design D : |- xi = (+ xi {1} (- xi.1 { {2} => dai }))\n"
                      "design E : xi |- = (- xi { {1} => (+ xi.1 {2} (- xi.1.2 {})) })\n";
    LudLibrary *lib = NULL;
    if (lud_library_parse(src, &lib) != LUD_STATUS_OK) return 1;
    LudOutcome *out = NULL;
    if (lud_normalize(lib, "D,E", "xi", 100, &out) != LUD_STATUS_OK) return 2;
    if (lud_outcome_verdict(out) != LUD_VERDICT_CONVERGED) return 3;
    char *text = lud_outcome_trace_text(out);
    printf("%s", text);
    int ok = strstr(text, "VERDICT: converged") != NULL;
    lud_string_free(text);
    lud_outcome_free(out);

    if (lud_library_parse("design X : |- 0 = (+", &lib) != LUD_STATUS_PARSE) return 4;
    char *msg = lud_last_error_message();
    if (msg == NULL) return 5;
    lud_string_free(msg);
    return ok ? 0 : 6;
}
