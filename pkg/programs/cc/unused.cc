# unused continuation: callcc is invisible
callcc k. 5
