package main

func Handler() error {
	return nil
